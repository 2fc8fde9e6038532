from django.apps import AppConfig


class SymdynConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'symdyn'
