import pyannote
