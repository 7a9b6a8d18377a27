"""Programmable measurement devices: joint measurability, incompatibility
robustness, guessing games with post-information, and convertibility under
free operations. Thin wrapper over the C++ core."""

from ._pmdkit import (
    ChoiMap,
    ClassicalStrategy,
    CompatibilityResult,
    ConversionCertificate,
    DualResult,
    Ensemble,
    FreeOperation,
    GuessingGame,
    Pmd,
    Povm,
    AdvantageReport,
    RobustnessResult,
    RobustnessWitness,
    SimpleDecomposition,
    StrategyValue,
    Verdict,
    WitnessOutcome,
    apply_free_operation,
    bb84_game,
    check_simple,
    compose_free_operations,
    convertibility_lp,
    identity_operation,
    incompatibility_witness_check,
    mix_pmds,
    noisy_mub_pmd,
    pguess_classical,
    pguess_seesaw,
    pguess_simple,
    random_ensemble,
    random_free_operation,
    random_pmd,
    random_simple_pmd,
    reconstruct,
    refute_by_game_search,
    robustness_dual,
    robustness_primal,
    simple_interconvert,
    validate_pmd,
    verify_advantage_identity,
    witness_to_game,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
