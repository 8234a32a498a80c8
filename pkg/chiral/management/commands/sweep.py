"""
Django management command to run one parameter sweep and write its dataset

Usage:
    python manage.py sweep --task phase_map --out phase_map.csv
    python manage.py sweep --task spectrum_cut --param UN=1 --phi-series 0,pi/4,pi/2
    python manage.py sweep --task gap_scaling --config chiral.env --format json
    python manage.py sweep --task ed_check --param g=2.449489742783178 --param phi=pi/4 --n-list 4,8,12
"""

import logging

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from chiral import config_file, output, sweeps
from chiral.exceptions import ChiralDickeError

logger = logging.getLogger(__name__)

# dedicated flags -> config keys
FLAG_KEYS = {
    'axis1': 'axis1',
    'axis2': 'axis2',
    'phi_series': 'phi_series',
    'omega_z_series': 'omega_z_series',
    'n_list': 'n_list',
    'window': 'window',
    'points': 'points',
    'sides': 'sides',
}


class Command(BaseCommand):
    help = 'Run one chiral Dicke parameter sweep and write a CSV or JSON dataset'

    def add_arguments(self, parser):
        parser.add_argument(
            '--task',
            required=True,
            choices=sweeps.SweepTask.values,
            help='Sweep to run (one task per invocation)'
        )
        parser.add_argument(
            '--config',
            help='key = value parameter file (omega_c, omega_z, g1/g2 or g/phi, U or UN, N, sweep keys)'
        )
        parser.add_argument(
            '--param',
            action='append',
            default=[],
            metavar='KEY=VALUE',
            help='Override one config key (repeatable)'
        )
        parser.add_argument('--out', help='Output path (default: stdout)')
        parser.add_argument('--format', choices=sorted(output.RENDERERS), default='csv', help='Output format (default: csv)')
        parser.add_argument(
            '--threads',
            type=int,
            help='Worker threads (default: CHIRAL_SWEEP_THREADS)'
        )
        parser.add_argument('--axis1', help='name:start:stop:count[:log]')
        parser.add_argument('--axis2', help='name:start:stop:count[:log]')
        parser.add_argument('--phi-series', dest='phi_series', help='Comma-separated phi values for spectrum_cut')
        parser.add_argument('--omega-z-series', dest='omega_z_series', help='Comma-separated omega_z values for critical_line')
        parser.add_argument('--n-list', dest='n_list', help='Comma-separated atom numbers for ed_check')
        parser.add_argument('--window', help='Relative fit window lower,upper')
        parser.add_argument('--points', help='Sample points per fit')
        parser.add_argument('--sides', help='from_normal and/or from_superradiant, comma-separated')

    def resolve_values(self, options):
        """Defaults < config file < --param < dedicated flags"""
        values = {}
        if options.get('config'):
            values.update(config_file.load_config(options['config']))
        values.update(config_file.parse_assignments(options.get('param')))
        flags = {key: options[flag] for flag, key in FLAG_KEYS.items() if options.get(flag) is not None}
        values.update(config_file.parse_entries(flags, 'command line'))
        return values

    def handle(self, *args, **options):
        task = options['task']
        threads = options.get('threads') or getattr(settings, 'CHIRAL_SWEEP_THREADS', 1)

        try:
            values = self.resolve_values(options)
            spec = sweeps.build_spec(values, task, threads)
        except ValidationError as e:
            raise CommandError('; '.join(e.messages))
        except ChiralDickeError as e:
            raise CommandError(f'Invalid sweep settings: {e}')

        logger.info(f"Sweep {task}: " + ' '.join(f'{key}={value}' for key, value in spec.meta().items()))
        # progress goes to stderr when the dataset itself is written to stdout
        status = self.stdout if options.get('out') else self.stderr
        status.write(f'Running {task} with {spec.threads} thread(s)...')

        try:
            result = sweeps.run(spec)
        except ChiralDickeError as e:
            raise CommandError(f'{task} could not be set up: {e}')

        output.write_result(result, options.get('out'), options['format'], stream=self.stdout)

        errors = result.error_rows
        for fit in result.fits:
            style = self.style.WARNING if fit.poor_fit else self.style.SUCCESS
            status.write(style(
                f'  * {fit.side}: z_nu = {fit.z_nu:.4f}, prefactor = {fit.prefactor:.6f}, r^2 = {fit.r_squared:.6f}'
            ))
        if errors:
            for row in errors[:5]:
                status.write(self.style.ERROR(f'  ! {row["error"]}'))
            raise CommandError(f'{task}: {len(errors)} of {len(result.rows)} rows are error rows')

        destination = options.get('out') or 'stdout'
        status.write(self.style.SUCCESS(f'{task}: wrote {len(result.rows)} rows to {destination}'))
