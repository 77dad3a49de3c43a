from django.db import models

METHOD_CHOICES = [
    ('skpca', 'SKPCA'),
    ('rnca', 'RNCA'),
    ('nystrom', 'Nystrom'),
]

# fixed column order of the report CSV
REPORT_COLUMNS = [
    'method',
    'sample_size',
    'ell',
    'space_entries',
    'spectral_err',
    'frobenius_err',
    'rank_k_frobenius',
    'train_seconds',
    'test_seconds',
    'seed',
    'n',
    'd',
    'eps',
    'delta',
    'k',
    'sigma',
]


def space_formula(method, sample_size, d, ell=None):
    """Logical space of a trained method: md+ml, m^2+md or c^2+cd."""
    if method == 'skpca':
        if ell is None:
            raise ValueError("skpca space needs ell")
        return sample_size * d + sample_size * ell
    if method in ('rnca', 'nystrom'):
        return sample_size ** 2 + sample_size * d
    raise ValueError(f"unknown method {method!r}")


# one cell of a benchmark grid (method, configuration, dataset)
class ErrorReport(models.Model):
    run_label = models.CharField(max_length=100, blank=True, default='', verbose_name="benchmark run")
    method = models.CharField(max_length=10, choices=METHOD_CHOICES)
    sample_size = models.PositiveIntegerField(verbose_name="m or c")
    ell = models.PositiveIntegerField(blank=True, null=True)
    space_entries = models.BigIntegerField()

    spectral_err = models.FloatField(verbose_name="||G - G'||_2 / n")
    frobenius_err = models.FloatField(verbose_name="||G - G'||_F / n^2")
    rank_k_frobenius = models.FloatField(blank=True, null=True, verbose_name="||G - G'_k||_F / n^2")

    train_seconds = models.FloatField(blank=True, null=True)
    test_seconds = models.FloatField(blank=True, null=True)

    seed = models.BigIntegerField()
    n = models.PositiveIntegerField()
    d = models.PositiveIntegerField()
    eps = models.FloatField(blank=True, null=True)
    delta = models.FloatField(blank=True, null=True)
    k = models.PositiveIntegerField()
    sigma = models.FloatField(default=1.0)

    class Meta:
        ordering = ['run_label', 'id']

    def expected_space(self):
        return space_formula(self.method, self.sample_size, self.d, self.ell)

    def as_row(self):
        return [getattr(self, column) for column in REPORT_COLUMNS]

    def __str__(self):
        size = f"m={self.sample_size}" if self.method != 'nystrom' else f"c={self.sample_size}"
        ell = f", ell={self.ell}" if self.ell else ''
        return f"{self.method} ({size}{ell}): spectral={self.spectral_err:.3g}, frobenius={self.frobenius_err:.3g}"
