# Generated by Django 5.0.4 on 2026-10-17 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='StoredPartition',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=200, unique=True)),
                ('definition', models.JSONField()),
                ('size', models.PositiveIntegerField(default=0)),
                ('created', models.DateTimeField(auto_now_add=True)),
            ],
        ),
        migrations.CreateModel(
            name='GameRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('x0', models.CharField(max_length=100)),
                ('black_ratio', models.CharField(max_length=100)),
                ('white_ratio', models.CharField(max_length=100)),
                ('black_strategy', models.CharField(default='random', max_length=20)),
                ('targets_mode', models.CharField(default='all', max_length=10)),
                ('seed', models.CharField(max_length=20)),
                ('rounds', models.PositiveIntegerField()),
                ('summary', models.JSONField(default=dict)),
                ('moves', models.JSONField(default=list)),
                ('verification', models.JSONField(default=dict)),
                ('passed', models.BooleanField(db_index=True, default=False)),
                ('created', models.DateTimeField(auto_now_add=True)),
                ('partition', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.SET_NULL, to='symdyn.storedpartition')),
            ],
            options={
                'ordering': ['-created', '-id'],
            },
        ),
    ]
