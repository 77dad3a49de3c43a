from django.apps import AppConfig


class SketchingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'sketching'
    verbose_name = 'Streaming kernel PCA sketches'
