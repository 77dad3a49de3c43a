# Generated by Django 4.2.15 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ErrorReport',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('run_label', models.CharField(blank=True, default='', max_length=100, verbose_name='benchmark run')),
                ('method', models.CharField(choices=[('skpca', 'SKPCA'), ('rnca', 'RNCA'), ('nystrom', 'Nystrom')], max_length=10)),
                ('sample_size', models.PositiveIntegerField(verbose_name='m or c')),
                ('ell', models.PositiveIntegerField(blank=True, null=True)),
                ('space_entries', models.BigIntegerField()),
                ('spectral_err', models.FloatField(verbose_name="||G - G'||_2 / n")),
                ('frobenius_err', models.FloatField(verbose_name="||G - G'||_F / n^2")),
                ('rank_k_frobenius', models.FloatField(blank=True, null=True, verbose_name="||G - G'_k||_F / n^2")),
                ('train_seconds', models.FloatField(blank=True, null=True)),
                ('test_seconds', models.FloatField(blank=True, null=True)),
                ('seed', models.BigIntegerField()),
                ('n', models.PositiveIntegerField()),
                ('d', models.PositiveIntegerField()),
                ('eps', models.FloatField(blank=True, null=True)),
                ('delta', models.FloatField(blank=True, null=True)),
                ('k', models.PositiveIntegerField()),
                ('sigma', models.FloatField(default=1.0)),
            ],
            options={
                'ordering': ['run_label', 'id'],
            },
        ),
    ]
