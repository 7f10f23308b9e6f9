const express = requrie("express");