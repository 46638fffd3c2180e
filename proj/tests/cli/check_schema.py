"""Validates every shipped config against the JSON Schema."""
import json
import pathlib
import sys

import jsonschema

schema = json.loads(pathlib.Path(sys.argv[1]).read_text())
jsonschema.Draft7Validator.check_schema(schema)
validator = jsonschema.Draft7Validator(schema)
bad = 0
configs = sorted(pathlib.Path(sys.argv[2]).glob("*.json"))
for path in configs:
    errors = list(validator.iter_errors(json.loads(path.read_text())))
    for e in errors:
        print(f"{path.name}: {'/'.join(map(str, e.path))}: {e.message}")
    bad += bool(errors)
print(f"{len(configs) - bad}/{len(configs)} configs valid")
sys.exit(1 if bad or not configs else 0)
