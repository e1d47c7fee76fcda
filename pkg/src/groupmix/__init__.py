"""Fourier analysis and convolution-mixing experiments on finite product groups."""

from groupmix.boost import (
    ExperimentLog,
    boost_pipeline,
    flatten_bound_check,
    l2_sq_dist_to_uniform,
    l2_to_linf_check,
    square_boost_check,
)
from groupmix.fourier import (
    Dist,
    FourierData,
    convolve,
    convolve_direct,
    convolve_fourier,
    fourier_forward,
    fourier_inverse,
    frobenius_norm_sq,
    low_weight_coefficients,
    make_dist,
    marginalize,
    point_mass,
    product_fourier_forward,
    product_fourier_inverse,
    tv_distance,
    uniform,
)
from groupmix.groups import (
    GroupSpec,
    GroupTable,
    ProductGroup,
    alt5,
    build_group,
    cyclic,
    flat_to_tuple,
    parse_group_spec,
    sl2,
    tuple_to_flat,
    verify_group,
)
from groupmix.irreps import (
    Irrep,
    IrrepSet,
    compute_irreps,
    get_irreps,
    load_irreps,
    quasirandomness_degree,
    save_irreps,
    verify_schur,
)
from groupmix.nof import BoxDist, advantage_curve, box_to_dist, exact_s, sample_s, verify_s_uniformity
from groupmix.repair import RepairCertificate, low_part, repair, verify_repair
from groupmix.uniformity import (
    UniformityReport,
    eps_k_uniform,
    eps_uniform,
    is_k_uniform_fourier,
    rep_bound_check,
)

__all__ = [
    "BoxDist",
    "Dist",
    "ExperimentLog",
    "FourierData",
    "GroupSpec",
    "GroupTable",
    "Irrep",
    "IrrepSet",
    "ProductGroup",
    "RepairCertificate",
    "UniformityReport",
    "advantage_curve",
    "alt5",
    "boost_pipeline",
    "box_to_dist",
    "build_group",
    "compute_irreps",
    "convolve",
    "convolve_direct",
    "convolve_fourier",
    "cyclic",
    "eps_k_uniform",
    "eps_uniform",
    "exact_s",
    "flat_to_tuple",
    "flatten_bound_check",
    "fourier_forward",
    "fourier_inverse",
    "frobenius_norm_sq",
    "get_irreps",
    "is_k_uniform_fourier",
    "l2_sq_dist_to_uniform",
    "l2_to_linf_check",
    "load_irreps",
    "low_part",
    "low_weight_coefficients",
    "make_dist",
    "marginalize",
    "parse_group_spec",
    "point_mass",
    "product_fourier_forward",
    "product_fourier_inverse",
    "quasirandomness_degree",
    "repair",
    "rep_bound_check",
    "sample_s",
    "save_irreps",
    "sl2",
    "square_boost_check",
    "tuple_to_flat",
    "tv_distance",
    "uniform",
    "verify_group",
    "verify_repair",
    "verify_s_uniformity",
    "verify_schur",
]
