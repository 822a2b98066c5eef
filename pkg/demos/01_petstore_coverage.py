"""
Coverage of the bundled Pet Store traffic
=========================================

Five recorded exchanges against a seven-operation API, scored end to end.
"""

import json
import tempfile
from pathlib import Path

from restcov import PETSTORE_DIR
from restcov.cli import format_summary
from restcov.pipeline import collect, statistics

spec = PETSTORE_DIR / "petstore.json"
dumps = PETSTORE_DIR / "dumps"
work = Path(tempfile.mkdtemp())

# stage one: parse the n-request.txt / n-response.txt pairs into a store
ingest = collect(spec, dumps, work / "db.sqlite")
for it in ingest.interactions:
    status = it.response.status_code if it.response else "orphan"
    print(it.sequence_id, it.request.method, it.request.raw_path, status, it.match.key if it.match else None)

# stage two: metrics and reports, read back from the store only
result = statistics(spec, work / "db.sqlite", work / "reports")
print(format_summary(result.report, ingest.tally.total))

# the PATCH call hit a real path but an undocumented method
ops = json.loads((work / "reports" / "operationCoverage.json").read_text())
print(json.dumps(ops, indent=2))
