from django.apps import AppConfig


class FormulationsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'formulations'
