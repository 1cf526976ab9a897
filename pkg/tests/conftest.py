import pytest
from fastapi.testclient import TestClient
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from database import get_db, init_db
from semnav.core.scenario_io import parse_scenario


def make_world(rows, label="chair", cell_size=0.25):
    """World from scenario rows ('#', '.', 'T', 'S')"""
    text = "\n".join(
        ["semnav-scenario v1", f"{len(rows[0])} {len(rows)} {cell_size}", *rows, f"target_label: {label}"]
    )
    return parse_scenario(text)


def open_rows(width, height, start, target, walls=()):
    """Rows of a walled rectangle with a start, a target and extra wall cells"""
    grid = [["." for _ in range(width)] for _ in range(height)]
    for c in range(width):
        grid[0][c] = grid[height - 1][c] = "#"
    for r in range(height):
        grid[r][0] = grid[r][width - 1] = "#"
    for r, c in walls:
        grid[r][c] = "#"
    grid[start[0]][start[1]] = "S"
    grid[target[0]][target[1]] = "T"
    return ["".join(row) for row in grid]


@pytest.fixture
def world_factory():
    return make_world


@pytest.fixture
def open_room():
    # 3 m x 3 m room, start in the middle, target in a corner
    return make_world(open_rows(12, 12, start=(6, 6), target=(1, 1)))


@pytest.fixture
def db_engine():
    engine = create_engine(
        "sqlite://", connect_args={"check_same_thread": False}, poolclass=StaticPool
    )
    init_db(engine)
    yield engine
    engine.dispose()


@pytest.fixture
def db_session(db_engine):
    session = sessionmaker(bind=db_engine)()
    try:
        yield session
    finally:
        session.close()


@pytest.fixture
def api_client(db_engine):
    from main import app

    TestingSession = sessionmaker(autocommit=False, autoflush=False, bind=db_engine)

    def override_get_db():
        db = TestingSession()
        try:
            yield db
        finally:
            db.close()

    app.dependency_overrides[get_db] = override_get_db
    yield TestClient(app)
    app.dependency_overrides.clear()
