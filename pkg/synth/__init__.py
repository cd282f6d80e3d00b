# Synthetic mouse sessions
from .generator import UserProfile, generate_corpus, generate_profile, generate_session

__all__ = ['UserProfile', 'generate_corpus', 'generate_profile', 'generate_session']
