#include "qclink/catalog.hpp"

#include <stdexcept>

namespace qclink {

namespace {

LinkParams make_link(std::string name, double length_km, double a_o, double a_c,
                     double a_l, double b_o, double db_o, double b_l, double db_l) {
  LinkParams p;
  p.name = std::move(name);
  p.length_km = length_km;
  p.alpha_o = Attenuation::per_km(a_o);
  p.alpha_c = Attenuation::per_km(a_c);
  p.alpha_l = Attenuation::per_km(a_l);
  p.beta_o = RamanCoefficient{b_o, db_o};
  p.beta_l = RamanCoefficient{b_l, db_l};
  return p;
}

}  // namespace

const std::vector<LinkParams>& link_catalog() {
  static const std::vector<LinkParams> catalog = {
      // name, L, alpha(O,C,L) km^-1, beta_O +/- , beta_L +/-  nm^-1 km^-1
      make_link("dab", 2.0, 0.55, 0.44, 0.5, 10.5e-10, 0.3e-10, 33e-10, 3.0e-10),
      make_link("anl", 57.0, 0.099, 0.076, 0.084, 4.6e-10, 0.1e-10, 20.8e-10, 0.3e-10),
      // one-way length quoted per deployed pair; same loss/Raman parameters
      make_link("anl-59", 59.0, 0.099, 0.076, 0.084, 4.6e-10, 0.1e-10, 20.8e-10, 0.3e-10),
  };
  return catalog;
}

const LinkParams& catalog_link(const std::string& name) {
  for (const auto& link : link_catalog())
    if (link.name == name) return link;
  throw std::invalid_argument("unknown catalog link: " + name);
}

double catalog_eta_s(Band pump_band) {
  switch (pump_band) {
    case Band::O: return 2.88;
    case Band::L: return 2.12;
    default:
      throw std::invalid_argument("eta_s is defined for O- and L-band pumps only");
  }
}

FiberSpec make_fiber(const LinkParams& link) {
  FiberSpec f;
  f.length_km = link.length_km;
  f.alpha_by_band = {{Band::O, link.alpha_o}, {Band::C, link.alpha_c}, {Band::L, link.alpha_l}};
  f.beta_by_pump = {{Band::O, link.beta_o}, {Band::L, link.beta_l}};
  f.validate();
  return f;
}

RamanContext make_raman_context(Band pump_band, double delta_lambda_nm) {
  return RamanContext{delta_lambda_nm, catalog_eta_s(pump_band)};
}

}  // namespace qclink
