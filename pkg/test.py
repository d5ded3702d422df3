#!/usr/bin/env python3
"""
MPCA Test Script
Quick test to verify the installation and basic functionality
"""

import sys
import logging
from pathlib import Path

# Add the project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from app.config import Settings
from app.services.generator import generate_instance
from app.services.reduction import decide_sat
from app.services.solver_manager import SolverManager
from app.models.sat import CnfFormula

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def test_basic_functionality():
    """Generate, solve and cross-check a small instance"""
    logger.info("🧪 Testing MPCA basic functionality...")

    try:
        logger.info("Testing configuration...")
        settings = Settings()
        logger.info(f"✅ Configuration loaded - threads: {settings.threads}")

        instance = generate_instance(3, 6, k=2, seed=7)
        logger.info(f"✅ Generated instance M={instance.num_users} N={instance.num_channels}")

        manager = SolverManager()
        auto = manager.solve(instance)
        exact = manager.solve(instance, "subset-dp")
        logger.info(f"✅ {auto.algorithm}: {auto.objective:.9f}, subset-dp: {exact.objective:.9f}")
        if abs(auto.objective - exact.objective) > 1e-9:
            raise RuntimeError("auto-dispatched solver disagrees with the exact oracle")

        cnf = CnfFormula(num_vars=1, clauses=((1, 1, -1),))
        if not decide_sat(cnf):
            raise RuntimeError("satisfiable formula decided UNSAT")
        logger.info("✅ Reduction decided a satisfiable formula")

        logger.info("🎉 Basic functionality test passed!")
        return True

    except Exception as e:
        logger.error(f"❌ Test failed: {e}")
        return False


def main():
    """Main test function"""
    success = test_basic_functionality()
    if success:
        logger.info("🎉 All tests passed! Run `python main.py --help` to get started.")
    else:
        logger.error("❌ Some tests failed. Check the logs above.")
        sys.exit(1)


if __name__ == "__main__":
    main()
