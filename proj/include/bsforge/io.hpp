#pragma once

#include <string>

#include "bsforge/bounds.hpp"
#include "bsforge/forge.hpp"

namespace bsforge {

inline constexpr int kCertificateVersion = 1;

/// Container: "BSFCERT\n", header byte count, JSON header, little-endian float64 payload.
std::string encode_certificate(const Certificate &cert);
Certificate decode_certificate(const std::string &bytes);

void save_certificate(const Certificate &cert, const std::string &path);
Certificate load_certificate(const std::string &path);

/// Write-temp-then-rename.
void write_atomic(const std::string &path, const std::string &contents);

std::string report_json(const VerifyReport &rep);
std::string report_json(const BoundReport &rep);
std::string report_json(const DecayProfile &prof);

} // namespace bsforge
