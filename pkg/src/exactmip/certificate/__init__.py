"""Proof certificates: writing, completion of weak lines, and checking."""
from .complete import CompletionError, complete_certificate
from .emit import CertificateBuilder
from .format import (
    Certificate, CertificateFormatError, CRow, Derivation, Reason, WeakPayload,
    parse_certificate, read_certificate, write_certificate,
)
from .verify import VerifyResult, verify_certificate, verify_file

__all__ = [
    "Certificate", "CertificateBuilder", "CertificateFormatError", "CompletionError", "CRow",
    "Derivation", "Reason", "VerifyResult", "WeakPayload", "complete_certificate",
    "parse_certificate", "read_certificate", "verify_certificate", "verify_file",
    "write_certificate",
]
