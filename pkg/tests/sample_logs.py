"""
Shared session fixtures for the tests.
"""
from mouse.event import EVENT_MOVE, MouseEvent

# A recorded 30-event movement session with its header. Two events repeat
# the coordinate of the event before them.
RECORDED_SESSION = """Timestamp	X	Y	Event Type	ID
1616448584.38407	1088	608	-1	0
1616448584.39206	1097	608	-1	0
1616448584.40092	1105	609	-1	0
1616448584.40905	1111	610	-1	0
1616448584.41694	1115	610	-1	0
1616448584.42525	1118	611	-1	0
1616448584.43254	1120	611	-1	0
1616448584.44124	1120	611	-1	0
1616448584.47240	1121	611	-1	0
1616448584.48063	1124	611	-1	0
1616448584.48944	1134	611	-1	0
1616448584.49721	1149	609	-1	0
1616448584.50498	1175	604	-1	0
1616448584.51301	1212	599	-1	0
1616448584.52069	1250	597	-1	0
1616448584.52879	1281	596	-1	0
1616448584.53722	1305	596	-1	0
1616448584.54413	1319	596	-1	0
1616448584.55292	1328	596	-1	0
1616448584.56013	1331	596	-1	0
1616448584.56824	1331	596	-1	0
1616448585.98513	1329	594	-1	0
1616448585.99257	1318	590	-1	0
1616448586.00097	1304	585	-1	0
1616448586.00924	1282	578	-1	0
1616448586.01713	1269	572	-1	0
1616448586.02524	1259	567	-1	0
1616448586.03287	1255	564	-1	0
1616448586.04110	1253	562	-1	0
1616448586.04918	1251	561	-1	0
"""

RECORDED_LINES = RECORDED_SESSION.splitlines()


def straight_events(count, dx=1, dy=0, dt=0.01, start=(100, 100), t0=0.0, user_id=0):
    """Uniform straight-line movement."""
    return [
        MouseEvent(t0 + i * dt, start[0] + i * dx, start[1] + i * dy, EVENT_MOVE, user_id)
        for i in range(count)
    ]


def random_events(rng, count, user_id=0, t0=0.0, repeat_timestamps=False):
    """Random walk with positive integer coordinates; optionally repeated timestamps."""
    events = []
    t = t0
    x, y = 4000, 4000
    for _ in range(count):
        events.append(MouseEvent(t, x, y, EVENT_MOVE, user_id))
        step = 0.0 if (repeat_timestamps and rng.random() < 0.3) else float(rng.uniform(0.002, 0.03))
        t += step
        x = int(x + rng.integers(-20, 21))
        y = int(y + rng.integers(-20, 21))
    return events
