"""Runs the tool on every sample config and validates each JSON report against the schema."""
import json
import pathlib
import subprocess
import sys

import jsonschema


def main():
    tool, schema_path, config_dir, out_dir = sys.argv[1:5]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failures = 0
    configs = sorted(pathlib.Path(config_dir).glob("*.yaml"))
    for cfg in configs:
        command = next(line.split(":", 1)[1].strip() for line in cfg.read_text().splitlines()
                       if line.startswith("command:"))
        target = out / (cfg.stem + ".json")
        proc = subprocess.run([tool, command, "--config", str(cfg), "--format", "json", "--out", str(target)],
                              capture_output=True, text=True)
        if proc.returncode not in (0, 2):
            print(f"FAIL {cfg.name}: exit {proc.returncode}\n{proc.stderr}")
            failures += 1
            continue
        text = target.read_text()
        doc = json.loads(text)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors[:5]:
            print(f"FAIL {cfg.name}: {'/'.join(map(str, e.path))}: {e.message[:200]}")
        failures += bool(errors)
        # the emitter output must survive a parse/re-dump with sorted keys unchanged in order
        if list(doc.keys()) != sorted(doc.keys()):
            print(f"FAIL {cfg.name}: top-level keys not sorted")
            failures += 1
        if not errors:
            print(f"ok   {cfg.name} (exit {proc.returncode})")
    # negative control: a bare number among the results must be rejected
    if configs:
        doc = json.loads((out / (configs[0].stem + ".json")).read_text())
        doc["results"]["bare"] = 1.0
        if validator.is_valid(doc):
            print("FAIL schema accepts a bare number in results")
            failures += 1
    print(f"{len(configs) - failures}/{len(configs)} reports valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
