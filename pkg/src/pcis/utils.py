"""
PCIS util functions.
"""

import hashlib
import json
import math

from pydantic import BaseModel, ValidationError


def format_validation_errors(validation_error: ValidationError) -> dict:
    """
    Util function to nicely format pydantic validation errors.
    :param validation_error: Pydantic ValidationError
    :return: (dict) error message 'detail' response
    """
    errors = validation_error.errors()
    if errors:
        messages = [
            f"{'.'.join(str(part) for part in err.get('loc', ()))}: "
            f"{err.get('msg', 'Validation error')}"
            for err in errors
        ]
        return {"detail": "; ".join(messages)}
    return {"detail": "Unknown validation error"}


def config_hash(model: BaseModel) -> str:
    """
    Hash a validated configuration model so that every artifact can be traced
    back to the exact configuration that produced it.
    :param model: Any pydantic model.
    :return: Hex SHA-256 digest of the canonical JSON dump.
    """
    payload = json.dumps(model.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def format_float(value: float) -> str:
    """
    Round-trip exact float formatting for CSV output.
    :param value: The value to format.
    :return: Shortest string that parses back to the same float.
    """
    return repr(float(value))


def binomial_sigma(probability: float, trials: int) -> float:
    """
    Standard deviation of an empirical frequency over independent trials.
    :param probability: Success probability.
    :param trials: Number of trials.
    :return: sqrt(p (1 - p) / n), or infinity for zero trials.
    """
    if trials <= 0:
        return math.inf
    return math.sqrt(probability * (1.0 - probability) / trials)


def coverage_threshold(probability: float, trials: int, sigmas: float = 3.0) -> float:
    """
    Lower acceptance threshold for an empirical coverage frequency.
    :param probability: Nominal coverage.
    :param trials: Number of trials.
    :param sigmas: Number of binomial standard deviations of slack.
    :return: probability - sigmas * binomial_sigma.
    """
    return probability - sigmas * binomial_sigma(probability, trials)
