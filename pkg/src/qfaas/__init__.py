"""Serverless quantum function gateway.

Subsystems:

- ``qfaas.circuit``    gate-list circuit IR, validation, stats, text form
- ``qfaas.qdsl``       declarative function language (params, template, post steps)
- ``qfaas.simulator``  statevector engine with seeded sampling and readout noise
- ``qfaas.providers``  backend catalog plus local/mock execution runtime
- ``qfaas.selector``   adaptive backend selection policy
- ``qfaas.jobstore``   durable job lifecycle state machine
- ``qfaas.registry``   function records and the validate/build/deploy pipeline
- ``qfaas.gateway``    token-secured HTTP API tying it all together
- ``qfaas.cli``        command-line client for the HTTP API
"""

__version__ = "0.1.0"
