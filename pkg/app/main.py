import streamlit as st

from config import load_settings, setup_logging
from metrics import VectorStream, analyze, comparisons_frame, pair_reports, reports_frame
from multipliers import (
    PARTITIONED_CLA,
    PARTITIONED_HYBRID,
    REGULAR_CLA,
    MultiplierConfig,
    build_final_stage,
    build_multiplier,
    verify,
)
from netlist import critical_depth
from utils import PRESET_WIDTHS

VARIANTS = (REGULAR_CLA, PARTITIONED_CLA, PARTITIONED_HYBRID)

settings = load_settings()
setup_logging(settings)


@st.cache_resource
def build_designs(n: int):
    """
    Build the three variants for one width, cached across Streamlit reruns.

    :param n: operand width
    :return: dict variant -> MultiplierNetlist
    """
    print(f"🔧 Building multipliers for n={n} (cached after the first run)...")
    designs = {variant: build_multiplier(MultiplierConfig(n, variant)) for variant in VARIANTS}
    print("✅ Multipliers built and cached!")
    return designs


@st.cache_data
def analyze_designs(n: int, vectors: int, seed: int):
    designs = build_designs(n)
    stream = VectorStream(vectors, seed)
    return [analyze(designs[v].netlist, vector_stream=stream, workers=settings.workers) for v in VARIANTS]


@st.cache_data
def final_stage_depths(n: int):
    """Critical depth of each partitioned design's final adder built on its own."""
    return {kind: critical_depth(build_final_stage(n, kind)) for kind in (PARTITIONED_CLA, PARTITIONED_HYBRID)}


st.set_page_config(page_title="Partitioned Dadda Multiplier", layout="wide")


def create_streamlit_app():
    """
    Render the dashboard: per-design unit-gate report, the regular-vs-proposed
    comparison, the ablation rows, the final adders' own depths and an
    on-demand random verification.
    """
    st.title("🧮 Partitioned Dadda Multiplier Explorer")
    st.caption("Unit-gate proxies: area units, critical depth and toggle count over seeded random vectors.")

    col1, col2, col3 = st.columns(3)
    n = col1.selectbox("Operand width", PRESET_WIDTHS, index=0)
    vectors = col2.number_input("Toggle vectors", min_value=0, max_value=100_000, value=settings.vectors, step=100)
    seed = col3.number_input("Seed", min_value=0, value=settings.seed, step=1)

    with st.spinner("🔧 Generating and analysing netlists..."):
        reports = analyze_designs(int(n), int(vectors), int(seed))

    st.subheader("Designs")
    st.dataframe(reports_frame(reports), hide_index=True)

    comparisons, ablations = pair_reports(reports)
    st.subheader("Regular with reference to the proposed multiplier (%)")
    st.dataframe(comparisons_frame(comparisons), hide_index=True)
    st.subheader("Ablation (%)")
    st.dataframe(comparisons_frame(ablations), hide_index=True)

    st.subheader("Final adder in isolation (unit-gate depth)")
    depths = final_stage_depths(int(n))
    left, right = st.columns(2)
    left.metric("n-bit prefix CLA", depths[PARTITIONED_CLA])
    right.metric("Hybrid CLA + MBEC", depths[PARTITIONED_HYBRID])

    if st.button("🔍 Verify 10,000 random products", key="verify"):
        designs = build_designs(int(n))
        for variant in VARIANTS:
            report = verify(designs[variant].netlist, "random", count=10_000, seed=int(seed))
            if report.passed:
                st.success(f"✅ {variant}: {report.cases} cases match a*b")
            else:
                st.error(f"❌ {variant}: counterexample {report.counterexample}")


if __name__ == "__main__":
    create_streamlit_app()
