# Hybrid aeroacoustic coupling pipeline

# Load environment variables before the configuration is read
from dotenv import load_dotenv

load_dotenv()
