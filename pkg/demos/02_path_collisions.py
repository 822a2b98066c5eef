"""
Which template owns a path?
===========================

A static segment beats a parameter, compared left to right.
"""

from restcov.matching import match_path
from restcov.spec_model import parse_specification

spec = parse_specification(
    {
        "openapi": "3.0.0",
        "servers": [{"url": "https://api.example.com/api"}],
        "paths": {
            "/users/{id}": {"get": {}},
            "/users/auth": {"post": {}},
            "/{tenant}/settings": {"get": {}},
            "/users/{id}/settings": {"get": {}},
        },
    }
)
print("server prefixes:", spec.server_prefixes)

# /users/settings fits both /users/{id} and /{tenant}/settings; the earlier static segment decides

for path in ["/users/auth", "/users/42", "/users/a%20b", "/users/settings", "/users/7/settings", "/nowhere/x/y"]:
    m = match_path(path, spec)
    print(f"{path:<22}", (m.template.template, m.extracted_parameters) if m else "no match")

# a method the template does not document still resolves the template
m = match_path("/users/auth", spec, method="GET")
print("GET /users/auth supported?", m.method_supported)
