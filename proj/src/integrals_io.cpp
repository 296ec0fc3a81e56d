#include "swrrst/integrals_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "swrrst/errors.hpp"

namespace swrrst {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& message) {
    throw ValidationError("line " + std::to_string(line) + ": " + message);
}

std::string format_entry(cplx v) {
    char buf[64];
    if (v.imag() == 0.0)
        std::snprintf(buf, sizeof(buf), "%.17g", v.real());
    else
        std::snprintf(buf, sizeof(buf), "(%.17g,%.17g)", v.real(), v.imag());
    return buf;
}

bool blank_or_comment(const std::string& line) {
    const std::size_t pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

/// Spatial-orbital store with duplicate detection: a slot written twice
/// (directly or through a symmetry image) must receive the same value.
class SymmetricStore {
  public:
    SymmetricStore(std::size_t slots) : values_(slots, 0.0), set_(slots, false) {}

    void assign(std::size_t slot, double value, std::size_t line) {
        if (set_[slot] && std::abs(values_[slot] - value) > 1e-12)
            fail(line, "symmetry violation: conflicts with an earlier record related by "
                       "permutational symmetry");
        values_[slot] = value;
        set_[slot] = true;
    }

    double operator[](std::size_t slot) const { return values_[slot]; }

  private:
    std::vector<double> values_;
    std::vector<char> set_;
};

struct FcidumpRecord {
    double value = 0.0;
    int i = 0, j = 0, k = 0, l = 0;
};

ManyBodyTensors parse_fcidump(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    // Header: a &FCI namelist, possibly spanning lines, closed by &END or /.
    int norb = -1;
    bool in_header = false;
    bool header_done = false;
    std::string namelist;
    while (!header_done && std::getline(in, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        if (!in_header) {
            const std::size_t pos = line.find_first_not_of(" \t");
            if (line.compare(pos, 4, "&FCI") != 0) fail(line_no, "expected an &FCI header");
            in_header = true;
            line = line.substr(pos + 4);
        }
        for (const std::string& close : {std::string("&END"), std::string("/")}) {
            const std::size_t end = line.find(close);
            if (end != std::string::npos) {
                line = line.substr(0, end);
                header_done = true;
            }
        }
        namelist += line + ",";
    }
    if (!header_done) fail(line_no, "unterminated &FCI header");

    // Pull NORB out of the namelist; other keys are tolerated metadata.
    for (std::size_t pos = 0; pos < namelist.size();) {
        const std::size_t eq = namelist.find('=', pos);
        if (eq == std::string::npos) break;
        std::string key = namelist.substr(pos, eq - pos);
        key.erase(0, key.find_first_not_of(" \t,"));
        key.erase(key.find_last_not_of(" \t") + 1);
        for (char& c : key) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        std::size_t next = namelist.find('=', eq + 1);
        std::size_t value_end = (next == std::string::npos)
                                    ? namelist.size()
                                    : namelist.rfind(',', next);
        if (value_end == std::string::npos || value_end < eq) value_end = namelist.size();
        if (key == "NORB") {
            try {
                norb = std::stoi(namelist.substr(eq + 1, value_end - eq - 1));
            } catch (const std::exception&) {
                fail(line_no, "cannot parse NORB value");
            }
        }
        pos = value_end + 1;
    }
    if (norb < 1) fail(line_no, "header must define NORB >= 1");
    if (2 * norb > ManyBodyTensors::kMaxTensorOrbitals)
        throw CapacityError("NORB=" + std::to_string(norb) + " needs " +
                            std::to_string(2 * norb) + " spin-orbitals, over the cap of " +
                            std::to_string(ManyBodyTensors::kMaxTensorOrbitals));

    const std::size_t n = static_cast<std::size_t>(norb);
    auto chem_slot = [n](int i, int j, int k, int l) {
        return ((static_cast<std::size_t>(i - 1) * n + (j - 1)) * n + (k - 1)) * n + (l - 1);
    };
    SymmetricStore chem(n * n * n * n);
    SymmetricStore one(n * n);
    double core = 0.0;
    bool core_set = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        std::istringstream ls(line);
        FcidumpRecord rec;
        if (!(ls >> rec.value >> rec.i >> rec.j >> rec.k >> rec.l))
            fail(line_no, "expected 'value i j k l'");
        std::string trailing;
        if (ls >> trailing) fail(line_no, "trailing content '" + trailing + "'");
        for (const int idx : {rec.i, rec.j, rec.k, rec.l})
            if (idx < 0 || idx > norb)
                fail(line_no, "orbital index " + std::to_string(idx) + " outside 0.." +
                                  std::to_string(norb));

        if (rec.i == 0 && rec.j == 0 && rec.k == 0 && rec.l == 0) {
            if (core_set && std::abs(core - rec.value) > 1e-12)
                fail(line_no, "conflicting core-energy records");
            core = rec.value;
            core_set = true;
        } else if (rec.i > 0 && rec.j == 0 && rec.k == 0 && rec.l == 0) {
            // orbital-energy record: tolerated metadata
        } else if (rec.i > 0 && rec.j > 0 && rec.k == 0 && rec.l == 0) {
            const double v = rec.value;
            one.assign(static_cast<std::size_t>(rec.i - 1) * n + (rec.j - 1), v, line_no);
            one.assign(static_cast<std::size_t>(rec.j - 1) * n + (rec.i - 1), v, line_no);
        } else if (rec.i > 0 && rec.j > 0 && rec.k > 0 && rec.l > 0) {
            const int i = rec.i, j = rec.j, k = rec.k, l = rec.l;
            for (const auto& [a, b, c, d] :
                 {std::array{i, j, k, l}, std::array{j, i, k, l}, std::array{i, j, l, k},
                  std::array{j, i, l, k}, std::array{k, l, i, j}, std::array{l, k, i, j},
                  std::array{k, l, j, i}, std::array{l, k, j, i}})
                chem.assign(chem_slot(a, b, c, d), rec.value, line_no);
        } else {
            fail(line_no, "unrecognized zero pattern in record indices");
        }
    }

    // Spin-blocking: spatial P -> spin-orbitals 2P-1 (up), 2P (down).
    ManyBodyTensors t(2 * norb);
    t.core_energy = core;
    for (int p = 1; p <= norb; ++p)
        for (int q = 1; q <= norb; ++q) {
            const double v = one[static_cast<std::size_t>(p - 1) * n + (q - 1)];
            if (v == 0.0) continue;
            t.set_h(2 * p - 1, 2 * q - 1, v);
            t.set_h(2 * p, 2 * q, v);
        }

    // <pq|rs> = (PR|QS) delta(spin p, spin r) delta(spin q, spin s);
    // v^{pq}_{rs} = <pq|rs> - <pq|sr>.
    const int nso = 2 * norb;
    auto spatial = [](int p) { return (p + 1) / 2; };
    auto spin = [](int p) { return (p - 1) % 2; };
    auto braket = [&](int p, int q, int r, int s) -> double {
        if (spin(p) != spin(r) || spin(q) != spin(s)) return 0.0;
        return chem[chem_slot(spatial(p), spatial(r), spatial(q), spatial(s))];
    };
    for (int p = 1; p <= nso; ++p)
        for (int q = 1; q <= nso; ++q)
            for (int r = 1; r <= nso; ++r)
                for (int s = 1; s <= nso; ++s) {
                    const double v = braket(p, q, r, s) - braket(p, q, s, r);
                    if (v != 0.0) t.set_v(p, q, r, s, v);
                }
    t.validate();
    return t;
}

ManyBodyTensors parse_tensor_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    ManyBodyTensors t;
    bool sized = false;

    auto read_index = [&](std::istringstream& ls, const char* what) {
        int idx = 0;
        if (!(ls >> idx)) fail(line_no, std::string("cannot parse ") + what + " index");
        if (idx < 1 || idx > t.n_spin_orbitals())
            fail(line_no, std::string(what) + " index " + std::to_string(idx) +
                              " outside 1.." + std::to_string(t.n_spin_orbitals()));
        return idx;
    };
    auto read_value = [&](std::istringstream& ls) {
        cplx v;
        if (!(ls >> v)) fail(line_no, "cannot parse entry value");
        std::string trailing;
        if (ls >> trailing) fail(line_no, "trailing content '" + trailing + "'");
        return v;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (!sized) {
            if (tag != "norb") fail(line_no, "first entry must be 'norb N'");
            int n = 0;
            if (!(ls >> n)) fail(line_no, "cannot parse spin-orbital count");
            if (n < 1 || n > ManyBodyTensors::kMaxTensorOrbitals)
                fail(line_no, "spin-orbital count " + std::to_string(n) + " outside 1.." +
                                  std::to_string(ManyBodyTensors::kMaxTensorOrbitals));
            t = ManyBodyTensors(n);
            sized = true;
            std::string trailing;
            if (ls >> trailing) fail(line_no, "trailing content '" + trailing + "'");
        } else if (tag == "core") {
            const cplx v = read_value(ls);
            if (v.imag() != 0.0) fail(line_no, "core energy must be real");
            t.core_energy = v.real();
        } else if (tag == "h") {
            const int p = read_index(ls, "row");
            const int q = read_index(ls, "column");
            t.set_h(p, q, read_value(ls));
        } else if (tag == "v") {
            const int p = read_index(ls, "first upper");
            const int q = read_index(ls, "second upper");
            const int r = read_index(ls, "first lower");
            const int s = read_index(ls, "second lower");
            t.set_v(p, q, r, s, read_value(ls));
        } else {
            fail(line_no, "unknown entry tag '" + tag + "'");
        }
    }
    if (!sized) fail(line_no, "missing 'norb N' entry");
    t.validate();
    return t;
}

} // namespace

IntegralFormat integral_format_from_name(const std::string& name) {
    if (name == "fcidump") return IntegralFormat::fcidump;
    if (name == "tensor-text") return IntegralFormat::tensor_text;
    throw ValidationError("unknown integral format '" + name +
                          "' (expected fcidump or tensor-text)");
}

std::string to_string(IntegralFormat format) {
    return format == IntegralFormat::fcidump ? "fcidump" : "tensor-text";
}

ManyBodyTensors parse_integrals(const std::string& text, IntegralFormat format) {
    return format == IntegralFormat::fcidump ? parse_fcidump(text) : parse_tensor_text(text);
}

ManyBodyTensors load_integrals(const std::string& path, IntegralFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open integrals file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_integrals(buffer.str(), format);
}

std::string tensor_text(const ManyBodyTensors& t) {
    const int n = t.n_spin_orbitals();
    std::string out = "norb " + std::to_string(n) + "\n";
    if (t.core_energy != 0.0) out += "core " + format_entry(t.core_energy) + "\n";
    for (int p = 1; p <= n; ++p)
        for (int q = 1; q <= n; ++q)
            if (t.h(p, q) != 0.0)
                out += "h " + std::to_string(p) + " " + std::to_string(q) + " " +
                       format_entry(t.h(p, q)) + "\n";
    for (int p = 1; p <= n; ++p)
        for (int q = 1; q <= n; ++q)
            for (int r = 1; r <= n; ++r)
                for (int s = 1; s <= n; ++s)
                    if (t.v(p, q, r, s) != 0.0)
                        out += "v " + std::to_string(p) + " " + std::to_string(q) + " " +
                               std::to_string(r) + " " + std::to_string(s) + " " +
                               format_entry(t.v(p, q, r, s)) + "\n";
    return out;
}

} // namespace swrrst
