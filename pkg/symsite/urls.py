"""
URL configuration for symsite project.

The REST surface of the symdyn app lives under /api/symdyn/; everything else
(partition checks, word tools, games, reproduction runs) is reachable through
``python manage.py <command>``.
"""
from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path("admin/", admin.site.urls),
    path("api/symdyn/", include("symdyn.urls")),
]
