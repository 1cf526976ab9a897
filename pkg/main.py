from contextlib import asynccontextmanager

from fastapi import FastAPI, Depends
from sqlalchemy import text
from sqlalchemy.orm import Session
from database import get_db, init_db
from dotenv import load_dotenv

from semnav import __version__
from semnav.api.routes import batches, episodes, scenarios

load_dotenv()


@asynccontextmanager
async def lifespan(app: FastAPI):
    init_db()
    yield


app = FastAPI(title="SemNav API", version=__version__, lifespan=lifespan)

# Include API routers
app.include_router(scenarios.router)
app.include_router(episodes.router)
app.include_router(batches.router)


@app.get("/")
def read_root():
    return {"message": "SemNav API", "status": "connected", "version": __version__}


@app.get("/health")
def health_check(db: Session = Depends(get_db)):
    try:
        db.execute(text("SELECT 1"))
        return {"status": "healthy", "database": "connected"}
    except Exception as e:
        return {"status": "unhealthy", "error": str(e)}
