"""Write an environment dict as JSON with one obstacle per line."""
import json
import sys


def dumps(doc: dict) -> str:
    lines = ["{"]
    keys = list(doc)
    for n, key in enumerate(keys):
        comma = "," if n < len(keys) - 1 else ""
        if key == "obstacles":
            obs = [f"    {json.dumps(o)}" for o in doc[key]]
            body = ",\n".join(obs)
            lines.append(f'  "obstacles": [\n{body}\n  ]{comma}' if obs else f'  "obstacles": []{comma}')
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(doc[key])}{comma}")
    lines.append("}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    for path in sys.argv[1:]:
        with open(path) as fh:
            doc = json.load(fh)
        with open(path, "w") as fh:
            fh.write(dumps(doc))
