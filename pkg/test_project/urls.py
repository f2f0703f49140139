"""django-mahnn URL Configuration

Only the admin is routed, it lists the recorded training runs.
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]
