import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from combigrad import settings
from combigrad.api import experiments, health, lab, meta, solvers
from combigrad.db import init_db

logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT)

DOCS_DESCRIPTION = """
## Flujo de uso

1. **Resolver una instancia**: `POST /solvers/solve` con
   `{"instance": {"family": "sp", "k": 4}, "weights": [...]}`.

2. **Gradiente a través del solver**: `POST /solvers/backward` con
   `w_hat`, `grad_y` y `lambda`.

3. **Explorar f_lambda**: `GET /lab/landscape?problem=toy&lambda=10&format=csv`.

4. **Experimentos**: `POST /experiments/run` con un config
   (`{"family": "sp", "k": 6, "preset": true}`), luego `GET /experiments/runs`.
"""


@asynccontextmanager
async def lifespan(app: FastAPI):
    init_db()
    yield


app = FastAPI(
    title="combigrad API",
    version=settings.API_VERSION,
    root_path=settings.ROOT_PATH,
    description=DOCS_DESCRIPTION,
    lifespan=lifespan,
)


# Routers
app.include_router(health.router)
app.include_router(meta.router, prefix="/meta", tags=["meta"])
app.include_router(solvers.router)  # ya tiene prefix="/solvers"
app.include_router(lab.router)  # ya tiene prefix="/lab"
app.include_router(experiments.router)  # ya tiene prefix="/experiments"
