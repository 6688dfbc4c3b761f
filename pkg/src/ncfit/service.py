"""Optional HTTP front end for the scenario dispatcher.

Requires the ``service`` extra (fastapi, pydantic).  Run with
``uvicorn ncfit.service:app``.
"""

from typing import Any, Optional

from fastapi import FastAPI
from pydantic import BaseModel

from .cli import TASKS, exit_code, run_scenario


class Scenario(BaseModel):
    group: Any
    prime: Optional[int] = None
    task: str
    payload: dict
    flags: dict = {}


app = FastAPI(title="ncfit")


@app.get("/tasks")
def tasks():
    return {"tasks": list(TASKS)}


@app.post("/run")
def run(scenario: Scenario):
    report = run_scenario(scenario.model_dump())
    report["exit_code"] = exit_code([report["verdict"]])
    return report
