import logging

import uvicorn
from fastapi import FastAPI

import config
from app.api.routes import router

logging.basicConfig(
    level=getattr(logging, config.LOG_LEVEL),
    format="%(asctime)s - %(levelname)s - %(message)s",
)

app = FastAPI(
    title="derived-limits",
    description="Local cohomology, torsion functors and derived limits of comodules over finite fields",
)

app.include_router(router, prefix="/api")


@app.get("/")
def root():
    return {"service": "derived-limits", "examples": config.CANNED_EXAMPLES}


if __name__ == "__main__":
    uvicorn.run("app.main:app", host="0.0.0.0", port=8000, reload=config.DEBUG)
