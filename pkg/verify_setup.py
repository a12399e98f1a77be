#!/usr/bin/env python3
"""
Geometric uncertainty toolkit - Setup Verification
Verifies dependencies, project files and a small end-to-end computation
"""

import sys
import os


def check_python_version():
    """Check Python version requirement"""
    print("🐍 Checking Python version...")
    if sys.version_info < (3, 9):
        print(f"❌ Python 3.9+ required, got {sys.version}")
        return False
    print(f"✅ Python {sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}")
    return True


def check_dependencies():
    """Check if required dependencies can be imported"""
    print("\n📦 Checking dependencies...")

    required_modules = [
        ('numpy', 'Linear algebra'),
        ('pandas', 'Report tables'),
        ('scipy', 'Quadrature oracles'),
        ('dotenv', 'Environment configuration'),
    ]

    optional_modules = [
        ('pytest', 'Test runner'),
        ('hypothesis', 'Property-based tests'),
        ('pytest_asyncio', 'Async test support'),
    ]

    success = True
    for module, description in required_modules:
        try:
            __import__(module)
            print(f"✅ {module} - {description}")
        except ImportError:
            print(f"❌ {module} - {description} (REQUIRED)")
            success = False

    print("\n📋 Test dependencies (install with pip install -r requirements.txt):")
    for module, description in optional_modules:
        try:
            __import__(module)
            print(f"✅ {module} - {description}")
        except ImportError:
            print(f"⚠️  {module} - {description} (needed to run the test suite)")

    return success


def check_project_structure():
    """Check if all required files are present"""
    print("\n📁 Checking project structure...")

    required_files = [
        'config.py',
        'errors.py',
        'hilbert.py',
        'projective.py',
        'uncertainty.py',
        'pointwise.py',
        'surface.py',
        'campaign.py',
        'reporting.py',
        'main.py',
        'requirements.txt',
        'pytest.ini',
    ]

    success = True
    for file in required_files:
        if os.path.exists(file):
            print(f"✅ {file}")
        else:
            print(f"❌ {file} (MISSING)")
            success = False

    return success


def check_configuration():
    """Check configuration and environment overrides"""
    print("\n⚙️ Checking configuration...")

    try:
        from config import Config, ENV_TOL_EQ, get_mode_names

        config = Config.from_env()
        print(f"✅ Config created (hbar={config.hbar}, tol_eq={config.tol_eq})")
        if os.getenv(ENV_TOL_EQ):
            print(f"✅ {ENV_TOL_EQ} override active")
        print(f"✅ Campaign modes: {', '.join(get_mode_names())}")
        return True
    except Exception as e:
        print(f"❌ Configuration error: {e}")
        return False


def check_pauli_smoke_test():
    """sigma_x, sigma_y at (1, 0) saturate the relation with both sides equal to 1"""
    print("\n🔧 Checking Pauli saturation case...")

    try:
        import numpy as np
        from hilbert import HermitianOperator, StateVector
        from uncertainty import rs_check
        from pointwise import verify_identity

        A = HermitianOperator.pauli('x')
        B = HermitianOperator.pauli('y')
        psi = StateVector(np.array([1.0, 0.0]))

        report = rs_check(A, B, psi)
        identity = verify_identity(A, B, psi)

        ok = (abs(report.lhs_operator_form - 1.0) < 1e-12 and abs(report.rhs_operator_form - 1.0) < 1e-12
              and report.saturated and abs(identity.dbar_norm_sq) < 1e-12)
        if ok:
            print(f"✅ rs_check lhs={report.lhs_operator_form:.3f} rhs={report.rhs_operator_form:.3f}, "
                  f"energy={identity.energy_coeff:.3f} symplectic={identity.symplectic_coeff:.3f}")
        else:
            print(f"❌ Unexpected values: {report} {identity}")
        return ok
    except Exception as e:
        print(f"❌ Smoke test error: {e}")
        return False


def main():
    """Main verification function"""
    print("🔍 Geometric Uncertainty Toolkit - Setup Verification")
    print("=" * 60)

    checks = [
        check_python_version,
        check_dependencies,
        check_project_structure,
        check_configuration,
        check_pauli_smoke_test,
    ]

    results = []
    for check in checks:
        try:
            result = check()
            results.append(result)
        except Exception as e:
            print(f"❌ Check failed: {e}")
            results.append(False)

    print("\n" + "=" * 60)
    print("📊 VERIFICATION SUMMARY")
    print("=" * 60)

    passed = sum(results)
    total = len(results)

    if passed == total:
        print("🎉 ALL CHECKS PASSED - System ready!")
        print("\n🚀 Next steps:")
        print("1. Run the tests: pytest")
        print("2. Run a campaign: python main.py --mode rs-verify --trials 10000")
        return True
    else:
        print(f"⚠️  {passed}/{total} checks passed - Some issues need attention")
        print("\n🔧 To fix issues:")
        print("1. Install missing dependencies: pip install -r requirements.txt")
        print("2. Run this script from the repository root")
        return False


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
