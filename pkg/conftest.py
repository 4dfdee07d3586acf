import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'isingldpc.settings')
django.setup()
