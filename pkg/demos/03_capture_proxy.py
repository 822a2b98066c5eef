"""
Recording traffic through the capture proxy
===========================================

A toy upstream on one port and the proxy on another. Each request
leaves dump files that the ingest stage reads straight back.
"""

import http.client
import tempfile
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from restcov import PETSTORE_DIR
from restcov.ingest import ingest_directory
from restcov.proxy import CaptureProxy, ProxyConfig
from restcov.spec_model import load_specification


class Upstream(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def do_GET(self):
        body = b'[{"id": 1, "name": "doggie"}]'
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


upstream = ThreadingHTTPServer(("127.0.0.1", 0), Upstream)
threading.Thread(target=upstream.serve_forever, daemon=True).start()
out = Path(tempfile.mkdtemp())

config = ProxyConfig("127.0.0.1:0", f"http://127.0.0.1:{upstream.server_address[1]}", out)
with CaptureProxy(config) as proxy:
    for target in ["/v2/pet/findByStatus?status=sold", "/v2/pet/1"]:
        conn = http.client.HTTPConnection(*proxy.address)
        conn.request("GET", target)
        print(target, "->", conn.getresponse().status)
        conn.close()
upstream.shutdown()

print(sorted(p.name for p in out.iterdir()))
print((out / "1-request.txt").read_text())

spec = load_specification(PETSTORE_DIR / "petstore.json")
for it in ingest_directory(out, spec).interactions:
    print(it.sequence_id, it.match.key, it.request.query_parameters, it.response.structured_body)

# the same proxy from a shell:
#   restcov proxy --listen 127.0.0.1:8081 --upstream http://localhost:8080 --out ./dumps
