"""Check if setup is correct."""
import sys

def check_dependencies():
    """Check if all required dependencies are installed."""
    missing = []
    
    required = [
        ("numpy", "numpy"),
        ("scipy", "scipy"),
        ("pydantic", "pydantic"),
        ("pydantic_settings", "pydantic-settings"),
        ("dotenv", "python-dotenv"),
    ]
    
    for module, package in required:
        try:
            __import__(module)
            print(f"[OK] {package}")
        except ImportError:
            print(f"[MISSING] {package}")
            missing.append(package)
    
    if missing:
        print(f"\n[ERROR] Missing dependencies: {', '.join(missing)}")
        print("Install with: pip install -r requirements.txt")
        return False
    
    print("\n[SUCCESS] All dependencies installed!")
    return True

def check_config():
    """Check that the settings load and the tolerances are usable."""
    from pathlib import Path

    from dotenv import load_dotenv
    load_dotenv()

    if not Path(".env").exists():
        print("[INFO] No .env file, using default settings")

    try:
        from src.guichard_lab.core.config import get_settings
        settings = get_settings()
    except Exception as e:
        print(f"[ERROR] Settings failed to load: {e}")
        return False

    bad = [
        name
        for name in ("FIRST_ORDER_TOL", "FD_FIRST_ORDER_TOL", "SECOND_ORDER_TOL", "CYCLIC_TOL", "PHI_TOL", "CURVATURE_TOL")
        if not getattr(settings, name) > 0
    ]
    if bad:
        print(f"[WARN] Non-positive tolerances: {', '.join(bad)}")
        return False
    if settings.GRID_POINTS < 3:
        print(f"[WARN] GRID_POINTS = {settings.GRID_POINTS} must be at least 3")
        return False

    print("[OK] Configuration looks good!")
    return True

def check_symbolic_engine():
    """Run the built-in symmetry check once."""
    from src.guichard_lab.symmetry.verify import verify_generator

    report = verify_generator()
    if not report.passed:
        print("[ERROR] Built-in generator does not reduce to zero")
        return False
    print(f"[OK] Symbolic engine: {len(report.instances)} equation instances reduce to zero")
    return True

if __name__ == "__main__":
    print("Checking Guichard Lab setup...\n")
    
    deps_ok = check_dependencies()
    config_ok = deps_ok and check_config()
    engine_ok = config_ok and check_symbolic_engine()
    
    if deps_ok and config_ok and engine_ok:
        print("\n[SUCCESS] Setup complete! You can now use the lab.")
        sys.exit(0)
    else:
        print("\n[ERROR] Setup incomplete. Please fix the issues above.")
        sys.exit(1)
