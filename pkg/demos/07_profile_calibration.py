"""How the cortex-m4-paper cycle coefficients were calibrated.

The extraction table is measured data and ships verbatim. The per-model
cycle coefficients are fitted here against three measured classifier
anchors, assuming cycles = MAC * c + extras + fixed:

  MLP  [100, 800, 100, 5]                  -> 1588 Kcycles
  SVM  rbf, 103 features, 1950 SVs, C=10   -> 2065 Kcycles
  RF   100 trees, worst-case depth 12      ->  4.84 Kcycles

Run this after editing a profile to confirm the anchors still land.
"""

from nilmedge.cost import CORTEX_M4_PAPER, validate_profile

profile = CORTEX_M4_PAPER
validate_profile(profile)  # full-vector row = 15 + 28 + 62 Kcycles

ANCHORS = [
    # (kind, mac, extras(n_sv), measured cycles)
    ("mlp", 100 * 800 + 800 * 100 + 100 * 5, 0, 1_588_000),
    ("svm", 1950 * 103 + 1950 * 9, 1950, 2_065_000),
    ("rf", 100 * 12, 0, 4_840),
]

print(f"profile '{profile.name}': {profile.clock_hz / 1e6:.0f} MHz, "
      f"window budget {profile.window_budget_cycles / 1e6} Mcycles\n")
print(f"{'kind':<5} {'c/MAC':>7} {'extra/SV':>9} {'fixed':>7} "
      f"{'modeled':>10} {'measured':>10} {'error':>7}")
for kind, mac, n_sv, measured in ANCHORS:
    coeff = profile.model_coefficients[kind]
    modeled = mac * coeff.cycles_per_mac + n_sv * coeff.kernel_eval_extra + coeff.fixed_overhead
    err = modeled / measured - 1
    print(f"{kind:<5} {coeff.cycles_per_mac:>7.2f} {coeff.kernel_eval_extra:>9.1f} "
          f"{coeff.fixed_overhead:>7.0f} {modeled:>10.0f} {measured:>10} {err:>+7.2%}")

# forest flash: node tables at 16 B/node plus per-tree code; 600 B/tree puts
# both reference forest sizes at plausible node counts
for trees, flash_kb in ((100, 126.2), (500, 649.4)):
    nodes = (flash_kb * 1000 - trees * profile.rf_code_overhead_bytes) / profile.rf_node_bytes
    print(f"\nRF {trees} trees at {flash_kb} kB -> {nodes / trees:.0f} nodes/tree implied")
