"""Voice-controlled assistant robot, entirely in software.

A speech-command server, a firmware emulator of the robot's two
microcontrollers, and a deterministic 2D world simulation, wired together
over a small binary framing protocol and steered from a web console or the
``voicebot`` CLI.
"""

__version__ = "0.1.0"
