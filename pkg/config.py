import os
from dotenv import load_dotenv

load_dotenv()

K_INITIAL = int(os.getenv("BONSAI_K_INITIAL", "1"))
K_GROWTH = float(os.getenv("BONSAI_K_GROWTH", "2"))
K_MAX = int(os.getenv("BONSAI_K_MAX", "64"))
TIMEOUT = float(os.getenv("BONSAI_TIMEOUT", "60"))
STEP_BUDGET = int(os.getenv("BONSAI_STEP_BUDGET", "1000000"))
DOWNSET_BACKEND = os.getenv("BONSAI_DOWNSET", "kdtree")
VECTOR_BACKEND = os.getenv("BONSAI_VECTOR", "lanes")
BOOL_STATES = os.getenv("BONSAI_BOOL_STATES", "on")
INPUT_SELECTION = os.getenv("BONSAI_INPUTS", "refined")
PRECOMPUTE = os.getenv("BONSAI_PRECOMPUTE", "on")
PICKER = os.getenv("BONSAI_PICKER", "critical")
SEED = int(os.getenv("BONSAI_SEED", "0"))
KDTREE_REBUILD = int(os.getenv("BONSAI_KDTREE_REBUILD", "64"))
FULLSET_COMPACT = int(os.getenv("BONSAI_FULLSET_COMPACT", "4"))
LOG_LEVEL = os.getenv("BONSAI_LOG_LEVEL", "WARNING")
