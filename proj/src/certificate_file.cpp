#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <regex>

#include "etcsim/certify.hpp"
#include "etcsim/control.hpp"
#include "etcsim/plant.hpp"

namespace etcsim {

namespace pt = boost::property_tree;

CertificateFile load_certificate_file(const std::string& path) {
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument("certificate file: " + std::string(e.what()));
    }
    CertificateFile f;
    f.kind = tree.get<std::string>("certificate.kind");
    if (f.kind != "petc" && f.kind != "psdetc" && f.kind != "padetc")
        throw std::invalid_argument("certificate file: kind must be petc, psdetc or padetc");
    f.sigma = tree.get("certificate.sigma", 0.2);

    CertificateBundle& b = f.bundle;
    b.P = parse_matrix(tree.get<std::string>("certificate.P"));
    b.rho = tree.get("certificate.rho", b.rho);
    b.T = tree.get("certificate.T", b.T);
    b.mu1 = tree.get("certificate.mu1", b.mu1);
    b.mu2 = tree.get("certificate.mu2", b.mu2);
    b.mu3 = tree.get("certificate.mu3", b.mu3);
    b.gamma = tree.get("certificate.gamma", b.gamma);
    b.beta1 = tree.get("certificate.beta1", b.beta1);
    b.beta2 = tree.get("certificate.beta2", b.beta2);
    b.varrho = tree.get("certificate.varrho", b.varrho);
    b.epsilon_default = tree.get("certificate.epsilon", b.epsilon_default);
    if (auto w = tree.get_optional<std::string>("certificate.omega")) b.omega = parse_vector(*w);

    // [epsilon] entries look like s<mask>_i<index> = value
    if (auto eps = tree.get_child_optional("epsilon")) {
        static const std::regex key(R"(s(\d+)_i(\d+))");
        for (const auto& [name, node] : *eps) {
            std::smatch m;
            if (!std::regex_match(name, m, key))
                throw std::invalid_argument("certificate file: bad epsilon key '" + name + "'");
            b.epsilon[{static_cast<unsigned>(std::stoul(m[1])), std::stoul(m[2])}] = node.get_value<double>();
        }
    }

    if (auto preset = tree.get_optional<std::string>("plant.preset")) {
        if (*preset != "waterbox") throw std::invalid_argument("certificate file: unknown plant preset");
        const int mode = tree.get("plant.mode", 2);
        if (mode != 1 && mode != 2) throw std::invalid_argument("certificate file: plant.mode must be 1 or 2");
        const PlantModel p = PlantModel::waterbox();
        const ControllerGains g = ControllerGains::waterbox();
        const Mode md = mode == 1 ? Mode::WeakPump : Mode::BothPumps;
        f.A = p.A;
        f.B = p.input_matrix(md);
        f.K = -g.gain(md);
    } else {
        f.A = parse_matrix(tree.get<std::string>("plant.A"));
        f.B = parse_matrix(tree.get<std::string>("plant.B"));
        f.K = parse_matrix(tree.get<std::string>("plant.K"));
    }
    return f;
}

bool check_certificate_file(const CertificateFile& f) {
    const ClosedLoopMatrices cl = build_closed_loop(f.A, f.B, f.K, f.sigma);
    if (f.kind == "petc") return check_petc_certificate(f.bundle, f.sigma, cl);
    if (f.kind == "psdetc") return check_psdetc_certificate(f.bundle, f.sigma, cl);
    return check_padetc_certificate(f.bundle, cl);
}

}  // namespace etcsim
