"""Console entrypoint for the hierq CLI; run from the project root so 'src' resolves."""
from src.app.main import main


if __name__ == "__main__":
    main()
