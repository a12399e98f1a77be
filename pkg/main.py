"""
Geometric uncertainty campaigns - Main Orchestration Module
Runs verification campaigns and surface experiments and writes their reports
"""

import sys
import asyncio
import logging
import os
import argparse
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from config import (
    Config, CampaignSpec, ReportConfig, CampaignDefaults, get_default_config, reset_default_config, get_mode_names
)
from campaign import (
    CampaignResult, trial_seeds, run_trial_chunk, collect_trials, SURFACE_CAMPAIGNS
)
from errors import GeometryError
from reporting import CampaignReporter, print_campaign_summary

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


def configure_logging(level: str = "INFO", output_dir: str = "."):
    """Log to the console and to the campaign log file"""
    os.makedirs(output_dir, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(output_dir, ReportConfig.LOG_FILE)),
            logging.StreamHandler()
        ]
    )


class CampaignRunner:
    """Main orchestration class for verification campaigns"""

    def __init__(self, spec: CampaignSpec, config: Config = None):
        self.spec = spec
        self.config = (config or Config()).with_hbar(spec.hbar)
        self.executor: Optional[ThreadPoolExecutor] = None
        self.reporter: Optional[CampaignReporter] = None

    async def initialize(self):
        """Validate the spec and set up the worker pool and report directory"""
        logger.info(f"Initializing {self.spec.mode.value} campaign...")

        self.spec.validate()
        self.reporter = CampaignReporter(self.spec.output_path)
        self.reporter.prepare()
        self.executor = ThreadPoolExecutor(max_workers=min(self.spec.workers, CampaignDefaults.MAX_WORKERS))

        logger.info(f"hbar={self.config.hbar} tol_eq={self.config.tol_eq} workers={self.spec.workers}")

    async def _run_trials(self) -> CampaignResult:
        mode, spec = self.spec.mode, self.spec
        seeds = trial_seeds(spec.seed, spec.trials)
        loop = asyncio.get_running_loop()
        semaphore = asyncio.Semaphore(spec.workers)

        async def run_chunk(start: int):
            stop = min(start + CampaignDefaults.CHUNK_SIZE, spec.trials)
            async with semaphore:
                return await loop.run_in_executor(
                    self.executor, run_trial_chunk, mode,
                    list(range(start, stop)), seeds[start:stop], spec, self.config
                )

        tasks = [run_chunk(start) for start in range(0, spec.trials, CampaignDefaults.CHUNK_SIZE)]
        chunks = await asyncio.gather(*tasks)

        outcomes = [outcome for chunk in chunks for outcome in chunk]
        logger.info(f"Evaluated {len(outcomes)} trials")
        return collect_trials(mode, outcomes, spec)

    async def run(self) -> CampaignResult:
        """Run the configured campaign"""
        logger.info(f"=== Phase: {self.spec.mode.value} ===")

        if self.spec.mode.uses_state_space:
            return await self._run_trials()

        loop = asyncio.get_running_loop()
        campaign = SURFACE_CAMPAIGNS[self.spec.mode]
        return await loop.run_in_executor(self.executor, campaign, self.spec, self.config)

    async def generate_reports(self, result: CampaignResult) -> List[str]:
        """Write report files and print the summary"""
        logger.info("Generating campaign reports...")
        paths = self.reporter.write_result(result)
        print_campaign_summary(result)
        return paths

    async def cleanup(self):
        """Clean up resources"""
        if self.executor:
            self.executor.shutdown(wait=True)
            self.executor = None
        logger.info("Cleanup completed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='Geometric uncertainty and energy identity campaigns')
    parser.add_argument('--mode', choices=get_mode_names(), help='Campaign to run')
    parser.add_argument('--dim', type=int, help='Hilbert space dimension n+1')
    parser.add_argument('--trials', type=int, help='Number of random trials or perturbations')
    parser.add_argument('--seed', type=int, help='Campaign seed')
    parser.add_argument('--hbar', type=float, help='Value of hbar')
    parser.add_argument('--grid-n', type=int, help='Grid nodes per axis')
    parser.add_argument('--grid-radius', type=float, help='Half-width R of the square [-R, R]^2')
    parser.add_argument('--levels', type=int, nargs='+', help='Grid sizes for the refinement study')
    parser.add_argument('--degree', type=int, help='Degree of the rational curve sample')
    parser.add_argument('--target-dim', type=int, help='n in CP^n for surface samples')
    parser.add_argument('--amplitude', type=float, help='Perturbation amplitude')
    parser.add_argument('--steps', type=int, help='Relaxation step budget')
    parser.add_argument('--step-size', type=float, help='Initial relaxation step size')
    parser.add_argument('--workers', type=int, help='Worker threads for trial campaigns')
    parser.add_argument('--force-equal', action='store_true', default=None,
                        help='Use B = A in point-identity trials')
    parser.add_argument('--out', help='Output directory for reports')
    parser.add_argument('--config', help='JSON campaign file; flags override its values')
    parser.add_argument('--log-level', default='INFO', help='Logging level')
    return parser


def spec_from_args(args: argparse.Namespace) -> CampaignSpec:
    """Campaign file (if any) overlaid with explicit flags"""
    spec = CampaignSpec.from_file(args.config) if args.config else CampaignSpec()
    return spec.merge_overrides({
        'mode': args.mode,
        'dim': args.dim,
        'trials': args.trials,
        'seed': args.seed,
        'hbar': args.hbar,
        'grid_n': args.grid_n,
        'grid_radius': args.grid_radius,
        'levels': args.levels,
        'degree': args.degree,
        'target_dim': args.target_dim,
        'amplitude': args.amplitude,
        'steps': args.steps,
        'step_size': args.step_size,
        'workers': args.workers,
        'force_equal': args.force_equal,
        'output_path': args.out,
    })


async def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point, returns the process exit code"""

    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        spec = spec_from_args(args)
        spec.validate()
    except (ValueError, TypeError, OSError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE

    configure_logging(args.log_level, spec.output_path)
    # Re-read GQM_TOL_EQ for this run
    reset_default_config()
    runner = CampaignRunner(spec, get_default_config())

    try:
        await runner.initialize()
        result = await runner.run()
        await runner.generate_reports(result)

    except KeyboardInterrupt:
        logger.info("Campaign interrupted by user")
        return EXIT_VIOLATION

    except GeometryError as e:
        logger.error(f"Campaign failed: {type(e).__name__}: {e}")
        return EXIT_VIOLATION

    finally:
        await runner.cleanup()

    return EXIT_OK if result.passed else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
