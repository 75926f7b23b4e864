from hypothesis import strategies as st

from lambda_fluor.model import SystemParams

rates = st.floats(0.2, 3.0)
rabi = st.floats(0.0, 4.0)
freqs = st.floats(-3.0, 3.0)


@st.composite
def system_params(draw, p=st.floats(0.0, 1.0), min_rabi=0.0):
    return SystemParams(
        gamma1=draw(rates),
        gamma2=draw(rates),
        omega1=draw(st.floats(min_rabi, 4.0)),
        omega2=draw(st.floats(min_rabi, 4.0)),
        detuning=draw(freqs),
        splitting=draw(freqs),
        p=draw(p),
    )


@st.composite
def symmetric_params(draw, p=st.just(1.0)):
    g = draw(st.floats(0.3, 2.0))
    om = draw(st.floats(0.2, 5.0))
    return SystemParams(g, g, om, om, draw(st.floats(-4, 4)), draw(st.floats(0.01, 0.5)), draw(p))
