from django.contrib import admin

from .models import GameRun, StoredPartition


@admin.register(StoredPartition)
class StoredPartitionAdmin(admin.ModelAdmin):
    list_display = ("name", "size", "created")
    search_fields = ("name",)


@admin.register(GameRun)
class GameRunAdmin(admin.ModelAdmin):
    list_display = ("id", "partition", "x0", "white_ratio", "black_strategy", "seed", "passed", "created")
    list_filter = ("passed", "black_strategy")
