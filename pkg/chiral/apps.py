from django.apps import AppConfig


class ChiralConfig(AppConfig):
    name = 'chiral'
    verbose_name = 'Chiral Dicke laboratory'
