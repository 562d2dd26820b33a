import os

class Settings:
    PRECISION_BITS: int = int(os.getenv("RPF_PRECISION_BITS", "64"))
    MAX_PRECISION_BITS: int = int(os.getenv("RPF_MAX_PRECISION_BITS", "65536"))
    NUMERIC_BITS: int = int(os.getenv("RPF_NUMERIC_BITS", "200"))
    CYCLE_MAX_STEPS: int = int(os.getenv("RPF_CYCLE_MAX_STEPS", "1000000"))
    MAX_CONCURRENCY: int = int(os.getenv("RPF_CONCURRENCY", "5"))
    PORT: int = int(os.getenv("PORT", "8080"))

settings = Settings()
