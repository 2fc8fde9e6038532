# symdyn/views.py
from __future__ import annotations

import logging
from typing import Any

from django.http import Http404, JsonResponse
from django.shortcuts import get_object_or_404
from rest_framework.decorators import api_view, permission_classes
from rest_framework.permissions import AllowAny
from rest_framework.response import Response

from .dynamics import codec
from .dynamics.circle import _fmt
from .dynamics.errors import InputError, PartitionValidationError, StrategyFailure, UnsupportedError
from .dynamics.experiments import run_game
from .dynamics.oracle import spectral_dimension
from .dynamics.sft import Word
from .models import GameRun, StoredPartition
from .serializers import GameRunSerializer, StoredPartitionSerializer

log = logging.getLogger(__name__)


# ────────────────────────────────────────────────────────────────────────────
# helpers
# ────────────────────────────────────────────────────────────────────────────
def _partition_from_request(data: dict) -> tuple[Any, StoredPartition | None]:
    """
    Accepts either {"partition_id": 3} or an inline {"partition": {...}}.
    """
    pid = data.get("partition_id")
    if pid is not None:
        stored = get_object_or_404(StoredPartition, pk=pid)
        return codec.partition_from_json(stored.definition), stored
    definition = data.get("partition")
    if not isinstance(definition, dict):
        raise InputError("partition_id or an inline partition is required")
    return codec.partition_from_json(definition), None


def _input_error(exc: InputError) -> Response:
    body: dict[str, Any] = {"detail": str(exc)}
    if isinstance(exc, PartitionValidationError):
        body["property"] = exc.prop
        if exc.witness is not None:
            body["witness"] = [_fmt(x) for x in exc.witness]
    return Response(body, status=400)


# ────────────────────────────────────────────────────────────────────────────
#  /api/symdyn/partitions/  – validate and store partition definitions
# ────────────────────────────────────────────────────────────────────────────
@api_view(["GET", "POST"])
@permission_classes([AllowAny])
def partitions(request):
    if request.method == "GET":
        qs = StoredPartition.objects.order_by("name")
        return Response(StoredPartitionSerializer(qs, many=True).data)

    name = (request.data.get("name") or "").strip()
    if not name:
        return Response({"detail": "name field required"}, status=400)
    try:
        p = codec.partition_from_json(request.data.get("definition") or {})
    except InputError as exc:
        return _input_error(exc)

    stored, created = StoredPartition.objects.update_or_create(
        name=name, defaults={"definition": p.to_json(), "size": p.size},
    )
    log.info("partitions: %s %s (%s elements)", "stored" if created else "updated", name, p.size)
    return Response(StoredPartitionSerializer(stored).data, status=201 if created else 200)


# ────────────────────────────────────────────────────────────────────────────
#  /api/symdyn/oracle/dim/  – spectral dimension of an avoiding set
# ────────────────────────────────────────────────────────────────────────────
@api_view(["POST"])
@permission_classes([AllowAny])
def oracle_dim(request):
    targets = request.data.get("targets") or []
    if not targets:
        return Response({"detail": "targets field required"}, status=400)
    try:
        p, _ = _partition_from_request(request.data)
        res = spectral_dimension(p, [Word.parse(str(g)) for g in targets])
    except UnsupportedError as exc:
        return Response({"detail": str(exc)}, status=422)
    except InputError as exc:
        return _input_error(exc)
    except Http404:
        raise
    except Exception as e:
        log.exception("oracle_dim failed")
        return Response({"detail": f"oracle failed: {e}"}, status=500)

    return Response({
        "dimension": res.dimension,
        "dimension_interval": list(res.dimension_interval),
        "rho_interval": [_fmt(res.rho_interval[0]), _fmt(res.rho_interval[1])],
        "components": res.components,
    })


# ────────────────────────────────────────────────────────────────────────────
#  /api/symdyn/games/  – play, verify and persist one Schmidt game
# ────────────────────────────────────────────────────────────────────────────
@api_view(["GET", "POST"])
@permission_classes([AllowAny])
def games(request):
    MAX_ROUNDS = 400

    if request.method == "GET":
        qs = GameRun.objects.all()[:50]
        return Response(GameRunSerializer(qs, many=True).data)

    try:
        rounds = int(request.data.get("rounds", 60))
    except (TypeError, ValueError):
        return Response({"detail": "rounds must be an integer"}, status=400)
    rounds = max(1, min(rounds, MAX_ROUNDS))

    try:
        p, stored = _partition_from_request(request.data)
        params = codec.params_from_json(request.data, partition=p)
        result = run_game(params, rounds)
    except StrategyFailure as exc:
        t = getattr(exc, "transcript", None)
        log.warning("games: strategy failure (%s)", exc)
        return Response({"detail": str(exc), "summary": t.summary() if t else None}, status=422)
    except InputError as exc:
        return _input_error(exc)
    except Http404:
        raise
    except Exception as e:
        log.exception("games failed")
        return Response({"detail": f"game failed: {e}"}, status=500)

    run = GameRun.record(result, partition=stored)
    return Response(GameRunSerializer(run).data, status=201)


# ────────────────────────────────────────────────────────────────────────────
#  /api/symdyn/games/<id>/  – stored run
# ────────────────────────────────────────────────────────────────────────────
@api_view(["GET"])
@permission_classes([AllowAny])
def game_detail(request, pk: int):
    run = get_object_or_404(GameRun, pk=pk)
    return Response(GameRunSerializer(run).data)


# ────────────────────────────────────────────────────────────────────────────
#  /api/symdyn/health/
# ────────────────────────────────────────────────────────────────────────────
@api_view(["GET"])
@permission_classes([AllowAny])
def health(_request):
    return JsonResponse({"ok": True})
