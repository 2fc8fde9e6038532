# symdyn/urls.py
from django.urls import path
from . import views

urlpatterns = [
    path("partitions/",          views.partitions,  name="partitions"),
    path("oracle/dim/",          views.oracle_dim,  name="oracle-dim"),

    # Schmidt games: play + verify + persist, then fetch by id
    path("games/",               views.games,       name="games"),
    path("games/<int:pk>/",      views.game_detail, name="game-detail"),
    path("health/",              views.health,      name="health"),
]
