#include "schatten/matrix_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "schatten/errors.hpp"

namespace schatten {

namespace {

nlohmann::json to_json(const ComplexMatrix& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const Complex& z : m.entries()) entries.push_back({z.real(), z.imag()});
    return {{"n", m.size()}, {"entries", std::move(entries)}};
}

double number(const nlohmann::json& v) {
    if (!v.is_number()) throw Error(ErrorKind::ParseError, "entry component is not a number");
    return v.get<double>();
}

} // namespace

std::string matrix_to_json(const ComplexMatrix& m) { return to_json(m).dump(); }

ComplexMatrix matrix_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("entries"))
        throw Error(ErrorKind::ParseError, "expected an object with fields n and entries");
    const auto& jn = doc["n"];
    if (!jn.is_number_integer() || jn.get<long long>() < 0)
        throw Error(ErrorKind::ParseError, "n must be a nonnegative integer");
    const auto n = jn.get<std::size_t>();
    const auto& entries = doc["entries"];
    if (!entries.is_array()) throw Error(ErrorKind::ParseError, "entries must be an array");
    if (entries.size() != n * n)
        throw Error(ErrorKind::ParseError, "non-square payload: " + std::to_string(entries.size()) +
                                               " entries for n = " + std::to_string(n));
    std::vector<Complex> values;
    values.reserve(entries.size());
    for (const auto& e : entries) {
        if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::ParseError, "entries must be [re, im] pairs");
        values.emplace_back(number(e[0]), number(e[1]));
    }
    return ComplexMatrix(n, std::move(values));
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return matrix_from_json(buf.str());
}

void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out << matrix_to_json(m) << '\n';
}

} // namespace schatten
