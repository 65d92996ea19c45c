from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__, config
from .errors import AutomatonFormatError, WqoError
from .routes import closures, orders, patterns, separability


@asynccontextmanager
async def lifespan(app: FastAPI):
    config.setup_logging()
    yield


app = FastAPI(title="WQO Separability API", version=__version__, lifespan=lifespan)

app.add_middleware(
    CORSMiddleware,
    allow_origins=config.ALLOWED_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(WqoError)
async def engine_error(request: Request, exc: WqoError):
    status = 422 if isinstance(exc, AutomatonFormatError) else 400
    return JSONResponse(status_code=status, content={"detail": str(exc), "error": type(exc).__name__})


app.include_router(orders.router)
app.include_router(closures.router)
app.include_router(patterns.router)
app.include_router(separability.router)

@app.get("/", tags=["Health"])
def root():
    return {"status": "ok"}

@app.get("/health", tags=["Health"])
def health():
    return {"status": "healthy"}
