// Regenerates the JSON fixtures under fixtures/ from the in-library
// definitions, keeping the shipped files and the code in lockstep.

#include <iostream>
#include <string>

#include "hybrid/io.hpp"

int main(int argc, char** argv) {
  using namespace hybrid;
  std::string dir = argc > 1 ? argv[1] : "fixtures";
  FixtureSet f = fixtures();
  save_channel(f.entangling_cnot, dir + "/entangling-cnot.json");
  save_channel(f.decohered_cnot, dir + "/decohered-cnot.json");
  save_channel(f.sector_measurement, dir + "/sector-measurement.json");
  save_generators(f.sector_generators, dir + "/sector-generators.json");
  save_generators(f.qubit_generators, dir + "/qubit-generators.json");

  json manifest;
  manifest["fixtures"] = json::array(
      {{{"name", "entangling-cnot"},
        {"channel", "entangling-cnot.json"},
        {"generators", "qubit-generators.json"},
        {"expected_violated", json::array({"iv"})},
        {"description",
         "Unitary CNOT with the quantum system controlling the classical "
         "register; reversible and signalling, but not classicality-preserving."}},
       {{"name", "decohered-cnot"},
        {"channel", "decohered-cnot.json"},
        {"generators", "qubit-generators.json"},
        {"expected_violated", json::array({"ii"})},
        {"description",
         "CNOT with the classical register dephased before and after; "
         "classicality-preserving and signalling, but irreversible."}},
       {{"name", "sector-measurement"},
        {"channel", "sector-measurement.json"},
        {"generators", "sector-generators.json"},
        {"expected_violated", json::array({"i"})},
        {"expected_blocks", json::array({1, 3})},
        {"description",
         "Which-sector readout of a 1+3 superselected system written into the "
         "classical register; reversible on the superselected domain and "
         "signalling, but the quantum system is reducible."}}});
  save_json(manifest, dir + "/manifest.json");
  std::cout << "fixtures written to " << dir << std::endl;
  return 0;
}
