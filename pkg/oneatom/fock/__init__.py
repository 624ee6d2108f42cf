from oneatom.fock.space import (  # noqa: F401
    FockVector,
    ModeOperator,
    annihilation_matrix,
    apply_displacement,
    coherent_fock_vector,
    inner_product,
    parity_expectation,
    recommended_dim,
    truncation_tail,
)
