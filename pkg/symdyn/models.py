from django.db import models


class StoredPartition(models.Model):
    name       = models.CharField(max_length=200, unique=True)
    definition = models.JSONField()     # partition file contents, rationals as "p/q"
    size       = models.PositiveIntegerField(default=0)
    created    = models.DateTimeField(auto_now_add=True)

    def __str__(self) -> str:
        return self.name


class GameRun(models.Model):
    partition = models.ForeignKey(StoredPartition, on_delete=models.SET_NULL, null=True, blank=True)

    # game parameters; rationals kept as exact strings
    x0             = models.CharField(max_length=100)
    black_ratio    = models.CharField(max_length=100)
    white_ratio    = models.CharField(max_length=100)
    black_strategy = models.CharField(max_length=20, default="random")
    targets_mode   = models.CharField(max_length=10, default="all")
    seed           = models.CharField(max_length=20)    # 64-bit unsigned, too wide for BigIntegerField
    rounds         = models.PositiveIntegerField()

    # outcome
    summary      = models.JSONField(default=dict)
    moves        = models.JSONField(default=list)
    verification = models.JSONField(default=dict)
    passed       = models.BooleanField(default=False, db_index=True)
    created      = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created", "-id"]

    @classmethod
    def record(cls, result: dict, partition: StoredPartition | None = None) -> "GameRun":
        """Persists one ``experiments.run_game`` result."""
        t = result["transcript"]
        params = result["summary"]["params"]
        return cls.objects.create(
            partition=partition,
            x0=params["x0"],
            black_ratio=params["black_ratio"],
            white_ratio=params["white_ratio"],
            black_strategy=params["black_strategy"],
            targets_mode=params["targets_mode"],
            seed=str(params["seed"]),
            rounds=result["summary"]["rounds"],
            summary=result["summary"],
            moves=[mv.to_json() for mv in t.moves],
            verification=result["verification"],
            passed=bool(result["verification"]["passed"]),
        )
