#pragma once

#include <string>

#include "swrrst/tensors.hpp"

namespace swrrst {

enum class IntegralFormat { fcidump, tensor_text };

/// Accepts "fcidump" or "tensor-text".
IntegralFormat integral_format_from_name(const std::string& name);
std::string to_string(IntegralFormat format);

/// Parses electron-integral text into antisymmetrized spin-orbital tensors.
///
/// FCIDUMP input holds chemists' (ij|kl) records over spatial orbitals with
/// the usual 8-fold symmetry, "value i j 0 0" one-body records and a
/// "value 0 0 0 0" core record.  Spatial orbital P becomes the adjacent
/// spin-orbital pair 2P-1 (up), 2P (down), and two-body records are
/// converted to physicists' antisymmetrized v^{pq}_{rs}.  Errors carry the
/// offending line number; records that disagree with an earlier record
/// related by symmetry raise a symmetry-violation error.
///
/// Tensor-text input is a direct spin-orbital dump: "norb N", "core E",
/// "h p q w" and "v p q r s w" lines, complex entries as "(re,im)".
ManyBodyTensors parse_integrals(const std::string& text, IntegralFormat format);

/// parse_integrals over the contents of a file.
ManyBodyTensors load_integrals(const std::string& path, IntegralFormat format);

/// Serializes tensors in the tensor-text format, 17 significant digits;
/// parse_integrals reads the result back bit-faithfully.
std::string tensor_text(const ManyBodyTensors& t);

} // namespace swrrst
