# Test package for hierq services and CLI.
