from rest_framework import serializers
from .models import GameRun, StoredPartition

class StoredPartitionSerializer(serializers.ModelSerializer):
    class Meta:
        model = StoredPartition
        fields = ["id", "name", "definition", "size", "created"]


class GameRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = GameRun
        fields = ["id", "partition", "x0", "black_ratio", "white_ratio",
                  "black_strategy", "targets_mode", "seed", "rounds",
                  "summary", "moves", "verification", "passed", "created"]
