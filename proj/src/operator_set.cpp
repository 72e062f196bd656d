#include "jdsse/operator_set.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "jdsse/errors.hpp"

namespace jdsse {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidParamsError("OperatorSet: " + msg);
}

void check_matrix(const CMat& m, int dim, const std::string& name) {
    require(m.rows() == dim && m.cols() == dim, name + " has wrong shape");
    require(m.allFinite(), name + " has non-finite entries");
}

CMat matrix_from_json(const nlohmann::json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw ConfigError(name + ": expected a matrix (array of rows)");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    CMat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ConfigError(name + ": ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& e = j[r][c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw ConfigError(name + ": matrix entries must be [re, im] pairs");
            m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

}  // namespace

void OperatorSet::validate() const {
    require(components >= 1, "component count must be >= 1");
    require(dim >= 1, "dimension must be >= 1");
    require(static_cast<int>(H.size()) == components, "need one H per component");
    for (int j = 0; j < components; ++j) {
        check_matrix(H[j], dim, "H[" + std::to_string(j) + "]");
        require(is_hermitian(H[j], 1e-12), "H[" + std::to_string(j) + "] is not Hermitian");
    }
    require(d1 >= 0 && d1 <= m1(), "d1 out of range");
    for (int a = 0; a < m1(); ++a) {
        require(static_cast<int>(L[a].size()) == components, "L channel needs one operator per component");
        for (int j = 0; j < components; ++j)
            check_matrix(L[a][j], dim, "L[" + std::to_string(a) + "][" + std::to_string(j) + "]");
    }
    require(d2 >= 0 && d2 <= m2(), "d2 out of range");
    for (int a = 0; a < m2(); ++a) {
        require(static_cast<int>(R[a].size()) == components, "R channel needs n x n operators");
        for (int j = 0; j < components; ++j) {
            require(static_cast<int>(R[a][j].size()) == components, "R channel needs n x n operators");
            for (int k = 0; k < components; ++k)
                check_matrix(R[a][j][k], dim, "R[" + std::to_string(a) + "]");
        }
    }
}

OperatorSet operator_set_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("operator set JSON: ") + e.what());
    }

    OperatorSet ops;
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw ConfigError("operator set JSON: missing integer field \"n\"");
    ops.components = j["n"].get<int>();
    if (!j.contains("H") || !j["H"].is_array())
        throw ConfigError("operator set JSON: missing array field \"H\"");
    for (std::size_t k = 0; k < j["H"].size(); ++k)
        ops.H.push_back(matrix_from_json(j["H"][k], "H[" + std::to_string(k) + "]"));
    if (ops.H.empty()) throw ConfigError("operator set JSON: \"H\" must be non-empty");
    ops.dim = static_cast<int>(ops.H[0].rows());

    if (j.contains("L")) {
        const auto& lj = j["L"];
        ops.d1 = lj.value("d1", 0);
        for (const auto& chan : lj.value("ops", nlohmann::json::array())) {
            std::vector<CMat> per_component;
            for (const auto& mj : chan) per_component.push_back(matrix_from_json(mj, "L"));
            ops.L.push_back(std::move(per_component));
        }
    }
    if (j.contains("R")) {
        const auto& rj = j["R"];
        ops.d2 = rj.value("d2", 0);
        for (const auto& chan : rj.value("ops", nlohmann::json::array())) {
            std::vector<std::vector<CMat>> block;
            for (const auto& row : chan) {
                std::vector<CMat> per_k;
                for (const auto& mj : row) per_k.push_back(matrix_from_json(mj, "R"));
                block.push_back(std::move(per_k));
            }
            ops.R.push_back(std::move(block));
        }
    }

    ops.validate();
    return ops;
}

OperatorSet load_operator_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open operator set file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return operator_set_from_json_text(buf.str());
}

}  // namespace jdsse
