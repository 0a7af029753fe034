import os

from dotenv import load_dotenv
from sqlalchemy import create_engine, text
from sqlalchemy.orm import sessionmaker

load_dotenv()

DATABASE_URL = os.getenv("COMBIGRAD_DATABASE_URL", "sqlite:///./combigrad.db")

_connect_args = {"check_same_thread": False} if DATABASE_URL.startswith("sqlite") else {}

engine = create_engine(DATABASE_URL, pool_pre_ping=True, connect_args=_connect_args)
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


RUN_RECORDS_DDL = """
    CREATE TABLE IF NOT EXISTS run_records (
      id INTEGER PRIMARY KEY AUTOINCREMENT,
      config_hash VARCHAR(64) NOT NULL,
      family VARCHAR(8) NOT NULL,
      k INTEGER NOT NULL,
      seed INTEGER NOT NULL,
      final_json TEXT NOT NULL,
      history_json TEXT NOT NULL,
      wall_time REAL NOT NULL,
      created_at VARCHAR(32) NOT NULL
    )
"""


def init_db(bind=None) -> None:
    """Crea la tabla de corridas si no existe."""
    with (bind or engine).begin() as conn:
        conn.execute(text(RUN_RECORDS_DDL))


def get_db():
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()
